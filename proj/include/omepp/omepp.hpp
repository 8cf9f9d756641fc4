#ifndef OMEPP_OMEPP_HPP
#define OMEPP_OMEPP_HPP

#include "omepp/bench.hpp"
#include "omepp/concurrent.hpp"
#include "omepp/energy.hpp"
#include "omepp/error.hpp"
#include "omepp/fingerprint.hpp"
#include "omepp/io.hpp"
#include "omepp/pcpd.hpp"
#include "omepp/rle.hpp"
#include "omepp/search.hpp"
#include "omepp/terrain.hpp"

#endif // OMEPP_OMEPP_HPP
