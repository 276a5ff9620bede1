#ifndef ANNIHILATOR_ANNIHILATOR_HPP
#define ANNIHILATOR_ANNIHILATOR_HPP

#include "annihilator/common.hpp"
#include "annihilator/rng.hpp"
#include "annihilator/parallel.hpp"
#include "annihilator/linalg.hpp"
#include "annihilator/group.hpp"
#include "annihilator/basis.hpp"
#include "annihilator/annihilation.hpp"
#include "annihilator/stft.hpp"
#include "annihilator/random_ensembles.hpp"
#include "annihilator/recovery.hpp"
#include "annihilator/io.hpp"
#include "annihilator/verify.hpp"
#include "annihilator/cli.hpp"

#endif  // ANNIHILATOR_ANNIHILATOR_HPP
