#pragma once

// Few-shot transfer learning for sensor-based activity recognition:
// stacked-LSTM sequence classifier, cross-domain class relevance, parameter
// transfer with fine-tuning, and the benchmark harness around them.

#include "fshar/adam.hpp"
#include "fshar/batch.hpp"
#include "fshar/data.hpp"
#include "fshar/errors.hpp"
#include "fshar/experiment.hpp"
#include "fshar/gradcheck.hpp"
#include "fshar/lstm.hpp"
#include "fshar/matrix.hpp"
#include "fshar/network.hpp"
#include "fshar/ngd.hpp"
#include "fshar/relevance.hpp"
#include "fshar/transfer.hpp"
