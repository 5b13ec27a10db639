#pragma once

#include <bvu/approx.hpp>
#include <bvu/errors.hpp>
#include <bvu/exact.hpp>
#include <bvu/generate.hpp>
#include <bvu/io.hpp>
#include <bvu/model.hpp>
#include <bvu/monte_carlo.hpp>
#include <bvu/probdist.hpp>
#include <bvu/reductions.hpp>
