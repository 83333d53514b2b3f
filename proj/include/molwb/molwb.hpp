#pragma once

#include "molwb/checker.hpp"
#include "molwb/eval.hpp"
#include "molwb/feas.hpp"
#include "molwb/field.hpp"
#include "molwb/finite_model.hpp"
#include "molwb/generators.hpp"
#include "molwb/io.hpp"
#include "molwb/subspace.hpp"
#include "molwb/term.hpp"
