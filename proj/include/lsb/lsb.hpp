#pragma once

#include "lsb/errors.hpp"
#include "lsb/spectral_core.hpp"
#include "lsb/network_model.hpp"
#include "lsb/equilibrium.hpp"
#include "lsb/sampling.hpp"
#include "lsb/bounds.hpp"
#include "lsb/regular_graph.hpp"
#include "lsb/oracle.hpp"
#include "lsb/io.hpp"
#include "lsb/sweep.hpp"
