#pragma once

#include <bestest/conduction.hpp>
#include <bestest/enclosure.hpp>
#include <bestest/error.hpp>
#include <bestest/harness.hpp>
#include <bestest/simulate.hpp>
#include <bestest/site.hpp>
#include <bestest/solar.hpp>
#include <bestest/weather.hpp>
