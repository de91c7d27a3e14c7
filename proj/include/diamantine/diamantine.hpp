#pragma once

#include <diamantine/error.hpp>
#include <diamantine/linalg.hpp>
#include <diamantine/framework.hpp>
#include <diamantine/gram.hpp>
#include <diamantine/critical.hpp>
#include <diamantine/auxetic.hpp>
#include <diamantine/cayley2d.hpp>
