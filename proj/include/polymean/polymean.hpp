#pragma once

#include "polymean/core.hpp"
#include "polymean/geometry.hpp"
#include "polymean/tessellation.hpp"
#include "polymean/replication.hpp"
#include "polymean/phantom.hpp"
#include "polymean/data.hpp"
#include "polymean/grid.hpp"
#include "polymean/recon2d.hpp"
#include "polymean/recon3d.hpp"
#include "polymean/io.hpp"
