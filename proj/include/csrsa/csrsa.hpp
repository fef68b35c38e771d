#pragma once

#include "csrsa/engine.hpp"
#include "csrsa/generators.hpp"
#include "csrsa/golden.hpp"
#include "csrsa/inference.hpp"
#include "csrsa/io.hpp"
#include "csrsa/model_compare.hpp"
#include "csrsa/random.hpp"
#include "csrsa/scene.hpp"
#include "csrsa/semantics.hpp"
#include "csrsa/stats.hpp"
#include "csrsa/variants.hpp"
