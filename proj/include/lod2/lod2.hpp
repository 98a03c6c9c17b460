#pragma once

#include "lod2/config.hpp"
#include "lod2/core.hpp"
#include "lod2/formats.hpp"
#include "lod2/geotransform.hpp"
#include "lod2/lsd.hpp"
#include "lod2/mesh.hpp"
#include "lod2/metrics.hpp"
#include "lod2/pipeline.hpp"
#include "lod2/polygon.hpp"
#include "lod2/raster.hpp"
#include "lod2/rectangle.hpp"
#include "lod2/roads.hpp"
#include "lod2/roof.hpp"
#include "lod2/scene.hpp"
#include "lod2/segmentation.hpp"
#include "lod2/simplify.hpp"
#include "lod2/stage_io.hpp"
#include "lod2/synthetic.hpp"
