#pragma once

// Umbrella header: the whole library.

#include "optomech/core.hpp"
#include "optomech/rng.hpp"
#include "optomech/params.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/gaussian.hpp"
#include "optomech/io_relations.hpp"
#include "optomech/sde_oracle.hpp"
#include "optomech/config.hpp"
#include "optomech/sweep.hpp"
#include "optomech/svg.hpp"
