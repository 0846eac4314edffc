#pragma once

#include "emcert/certify.hpp"
#include "emcert/corpus.hpp"
#include "emcert/errors.hpp"
#include "emcert/io.hpp"
#include "emcert/oracle.hpp"
#include "emcert/rng.hpp"
#include "emcert/simplex.hpp"
#include "emcert/verdict.hpp"
#include "emcert/witness.hpp"
