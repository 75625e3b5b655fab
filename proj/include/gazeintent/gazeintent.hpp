#pragma once

#include "gazeintent/bayes_model.hpp"
#include "gazeintent/distributions.hpp"
#include "gazeintent/engine.hpp"
#include "gazeintent/error.hpp"
#include "gazeintent/event_detector.hpp"
#include "gazeintent/features.hpp"
#include "gazeintent/geometry.hpp"
#include "gazeintent/io.hpp"
#include "gazeintent/metrics.hpp"
#include "gazeintent/random.hpp"
#include "gazeintent/replay.hpp"
#include "gazeintent/special_functions.hpp"
#include "gazeintent/svm.hpp"
#include "gazeintent/synth.hpp"
#include "gazeintent/training.hpp"
