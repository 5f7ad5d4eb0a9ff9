#pragma once

// Convenience umbrella: the whole toolkit.

#include "spicekit/annotation.hpp"
#include "spicekit/bench.hpp"
#include "spicekit/finetune.hpp"
#include "spicekit/geometry.hpp"
#include "spicekit/graph.hpp"
#include "spicekit/lint.hpp"
#include "spicekit/llm.hpp"
#include "spicekit/prompts.hpp"
#include "spicekit/repair.hpp"
#include "spicekit/spice.hpp"
