#pragma once

#include "hdbnn/harness/bundle.hpp"
#include "hdbnn/harness/config.hpp"
#include "hdbnn/harness/corpus.hpp"
#include "hdbnn/harness/experiment.hpp"
#include "hdbnn/harness/metrics.hpp"
#include "hdbnn/harness/pipeline.hpp"
#include "hdbnn/harness/split.hpp"
