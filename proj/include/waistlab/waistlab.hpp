#pragma once

#include "waistlab/cli.hpp"
#include "waistlab/config.hpp"
#include "waistlab/convex_bodies.hpp"
#include "waistlab/estimators.hpp"
#include "waistlab/experiments.hpp"
#include "waistlab/report.hpp"
#include "waistlab/sphere_geometry.hpp"
#include "waistlab/sphere_measure.hpp"
#include "waistlab/verification.hpp"
