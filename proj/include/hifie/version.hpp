#pragma once

#define HIFIE_VERSION_MAJOR 1
#define HIFIE_VERSION_MINOR 0
#define HIFIE_VERSION_PATCH 0
#define HIFIE_VERSION_STRING "1.0.0"
