#pragma once

// Everything at once.

#include "anyloss/approx.hpp"
#include "anyloss/bench.hpp"
#include "anyloss/confusion.hpp"
#include "anyloss/data.hpp"
#include "anyloss/errors.hpp"
#include "anyloss/evaluation.hpp"
#include "anyloss/gradcheck.hpp"
#include "anyloss/losses.hpp"
#include "anyloss/model_io.hpp"
#include "anyloss/network.hpp"
#include "anyloss/numeric.hpp"
#include "anyloss/parallel.hpp"
#include "anyloss/report.hpp"
#include "anyloss/resample.hpp"
#include "anyloss/sign_test.hpp"
