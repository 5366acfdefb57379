#pragma once

#include "adiafactor/errors.hpp"
#include "adiafactor/number_theory.hpp"
#include "adiafactor/encoding.hpp"
#include "adiafactor/state.hpp"
#include "adiafactor/hamiltonian.hpp"
#include "adiafactor/schedule.hpp"
#include "adiafactor/evolution.hpp"
#include "adiafactor/experiments.hpp"
#include "adiafactor/io.hpp"
