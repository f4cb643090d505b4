/**
 * @file focus.hpp
 * @brief Umbrella header.
 */

#pragma once

#include "focus/detect.hpp"
#include "focus/errors.hpp"
#include "focus/geneig.hpp"
#include "focus/matrix_io.hpp"
#include "focus/model_io.hpp"
#include "focus/pipeline.hpp"
#include "focus/projection.hpp"
#include "focus/random.hpp"
#include "focus/scatter.hpp"
#include "focus/set_collection.hpp"
#include "focus/synth.hpp"
