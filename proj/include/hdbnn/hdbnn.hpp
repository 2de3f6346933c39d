#pragma once

#include "hdbnn/baselines.hpp"
#include "hdbnn/bnn.hpp"
#include "hdbnn/harness.hpp"
#include "hdbnn/hdcore.hpp"
#include "hdbnn/packrt.hpp"
#include "hdbnn/textprep.hpp"
#include "hdbnn/vectorizer.hpp"
