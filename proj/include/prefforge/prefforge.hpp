#pragma once

// Umbrella header: pulls in the whole library except the CLI front end
// (include "prefforge/cli.hpp" separately if you want to embed the
// command-line driver, which drags in CLI11).

#include "prefforge/common.hpp"
#include "prefforge/encode.hpp"
#include "prefforge/evaluator.hpp"
#include "prefforge/guidance.hpp"
#include "prefforge/kernel.hpp"
#include "prefforge/losses.hpp"
#include "prefforge/model.hpp"
#include "prefforge/rng.hpp"
#include "prefforge/serialize.hpp"
#include "prefforge/tape.hpp"
#include "prefforge/tensor.hpp"
#include "prefforge/trainer.hpp"
#include "prefforge/world.hpp"
