#pragma once

#include "hdbnn/packrt/packed.hpp"
