// genbasis.hpp — umbrella header.

#pragma once

#include "genbasis/builtin.hpp"
#include "genbasis/config.hpp"
#include "genbasis/detect.hpp"
#include "genbasis/entropy.hpp"
#include "genbasis/linalg.hpp"
#include "genbasis/mobius.hpp"
#include "genbasis/renorm.hpp"
#include "genbasis/represent.hpp"
