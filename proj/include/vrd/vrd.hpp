#pragma once

#include "vrd/numcore.hpp"
#include "vrd/states.hpp"
#include "vrd/channels.hpp"
#include "vrd/protocols.hpp"
#include "vrd/rng.hpp"
#include "vrd/estimator.hpp"
#include "vrd/tomography.hpp"
#include "vrd/metrics.hpp"
#include "vrd/optics.hpp"
#include "vrd/teleport.hpp"
#include "vrd/experiments.hpp"
