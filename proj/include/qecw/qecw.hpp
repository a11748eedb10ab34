#pragma once

#include "qecw/codes.hpp"
#include "qecw/corpus.hpp"
#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/noise_model.hpp"
#include "qecw/rng.hpp"
#include "qecw/rotation.hpp"
#include "qecw/serialize.hpp"
#include "qecw/simulate.hpp"
#include "qecw/state_vector.hpp"
#include "qecw/transform.hpp"
#include "qecw/trials.hpp"
#include "qecw/validate.hpp"
