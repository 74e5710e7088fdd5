#ifndef POLARISPEC_POLARISPEC_HPP
#define POLARISPEC_POLARISPEC_HPP

#include "bathmap.hpp"
#include "core.hpp"
#include "faddeeva.hpp"
#include "io.hpp"
#include "scenario.hpp"
#include "spectra.hpp"
#include "susceptibility.hpp"

#endif // POLARISPEC_POLARISPEC_HPP
