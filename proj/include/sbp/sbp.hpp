#pragma once

#include "sbp/batch.hpp"
#include "sbp/bench.hpp"
#include "sbp/block_model.hpp"
#include "sbp/engine_types.hpp"
#include "sbp/entropy.hpp"
#include "sbp/errors.hpp"
#include "sbp/generator.hpp"
#include "sbp/graph.hpp"
#include "sbp/hungarian.hpp"
#include "sbp/mcmc.hpp"
#include "sbp/merge.hpp"
#include "sbp/metrics.hpp"
#include "sbp/nodal.hpp"
#include "sbp/partition.hpp"
#include "sbp/proposal.hpp"
#include "sbp/rng.hpp"
#include "sbp/search.hpp"
#include "sbp/streaming.hpp"
#include "sbp/tsv.hpp"
