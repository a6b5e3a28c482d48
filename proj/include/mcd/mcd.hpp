#pragma once
// Umbrella header.

#include "mcd/adam.hpp"
#include "mcd/ast.hpp"
#include "mcd/baselines.hpp"
#include "mcd/checkpoint.hpp"
#include "mcd/code2vec.hpp"
#include "mcd/config.hpp"
#include "mcd/corpus.hpp"
#include "mcd/dbscan.hpp"
#include "mcd/discover.hpp"
#include "mcd/errors.hpp"
#include "mcd/eval.hpp"
#include "mcd/generator.hpp"
#include "mcd/matrix.hpp"
#include "mcd/metrics.hpp"
#include "mcd/paths.hpp"
#include "mcd/pipeline.hpp"
#include "mcd/rubric.hpp"
#include "mcd/svg.hpp"
#include "mcd/ted.hpp"
#include "mcd/tfidf.hpp"
#include "mcd/training.hpp"
#include "mcd/tsne.hpp"
#include "mcd/turtle.hpp"
#include "mcd/vocab.hpp"
