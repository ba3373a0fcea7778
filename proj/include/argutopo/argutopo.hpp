#pragma once

#include "argutopo/csv.hpp"
#include "argutopo/error.hpp"
#include "argutopo/features.hpp"
#include "argutopo/io.hpp"
#include "argutopo/pipeline.hpp"
#include "argutopo/plot.hpp"
#include "argutopo/signal.hpp"
#include "argutopo/tda.hpp"
#include "argutopo/text_embedding.hpp"
