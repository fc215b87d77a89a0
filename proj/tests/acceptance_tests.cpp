#include <catch2/catch_amalgamated.hpp>
#include "prmix/prmix.hpp"
