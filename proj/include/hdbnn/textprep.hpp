#pragma once

#include "hdbnn/textprep/bpe.hpp"
#include "hdbnn/textprep/preprocess.hpp"
#include "hdbnn/textprep/stoplist.hpp"
#include "hdbnn/textprep/tokenize.hpp"
#include "hdbnn/textprep/wordpiece.hpp"
