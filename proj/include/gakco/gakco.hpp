#pragma once

#include "gakco/bench.hpp"
#include "gakco/binomial.hpp"
#include "gakco/error.hpp"
#include "gakco/gmer_engine.hpp"
#include "gakco/jobs.hpp"
#include "gakco/kernel_core.hpp"
#include "gakco/matrix_io.hpp"
#include "gakco/oracle.hpp"
#include "gakco/sequence_io.hpp"
#include "gakco/symmetric_matrix.hpp"
#include "gakco/trie_baseline.hpp"
