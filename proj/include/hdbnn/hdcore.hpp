#pragma once

#include "hdbnn/hdcore/io.hpp"
#include "hdbnn/hdcore/ops.hpp"
#include "hdbnn/hdcore/vectors.hpp"
