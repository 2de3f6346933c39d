#pragma once

#include "hdbnn/bnn/checkpoint.hpp"
#include "hdbnn/bnn/config.hpp"
#include "hdbnn/bnn/layers.hpp"
#include "hdbnn/bnn/model.hpp"
#include "hdbnn/bnn/train.hpp"
