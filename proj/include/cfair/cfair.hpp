#pragma once

#include "cfair/audit.hpp"
#include "cfair/csv.hpp"
#include "cfair/dag.hpp"
#include "cfair/dataset.hpp"
#include "cfair/error.hpp"
#include "cfair/latent.hpp"
#include "cfair/lingam.hpp"
#include "cfair/metrics.hpp"
#include "cfair/models.hpp"
#include "cfair/rng.hpp"
#include "cfair/scm.hpp"
#include "cfair/svg.hpp"
