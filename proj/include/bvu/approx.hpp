#pragma once

#include <bvu/approx/big_items.hpp>
#include <bvu/approx/config.hpp>
#include <bvu/approx/small_items.hpp>
#include <bvu/approx/solver.hpp>
