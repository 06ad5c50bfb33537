#pragma once

#include "chestnut/config.hpp"
#include "chestnut/csv.hpp"
#include "chestnut/dataset_io.hpp"
#include "chestnut/entity_gen.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/geo.hpp"
#include "chestnut/load_sim.hpp"
#include "chestnut/mobility.hpp"
#include "chestnut/perturbation.hpp"
#include "chestnut/pipeline.hpp"
#include "chestnut/qos_model.hpp"
#include "chestnut/rng.hpp"
#include "chestnut/stats.hpp"
#include "chestnut/trace_ingest.hpp"
#include "chestnut/validate.hpp"
