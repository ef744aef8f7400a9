#pragma once

#include "thermoswitch/error.hpp"
#include "thermoswitch/levels.hpp"
#include "thermoswitch/lz_params.hpp"
#include "thermoswitch/monotones.hpp"
#include "thermoswitch/open_system.hpp"
#include "thermoswitch/photoisomer_model.hpp"
#include "thermoswitch/quantum_core.hpp"
#include "thermoswitch/thermomaj.hpp"
#include "thermoswitch/version.hpp"
