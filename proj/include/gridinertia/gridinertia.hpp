#pragma once

#include "gridinertia/trace.hpp"
#include "gridinertia/slope.hpp"
#include "gridinertia/timestamp.hpp"
#include "gridinertia/ingest.hpp"
#include "gridinertia/preprocess.hpp"
#include "gridinertia/onset.hpp"
#include "gridinertia/rocof.hpp"
#include "gridinertia/inertia.hpp"
#include "gridinertia/synth.hpp"
#include "gridinertia/pipeline.hpp"
#include "gridinertia/report.hpp"
#include "gridinertia/selfcheck.hpp"
