#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "choroid/image.hpp"
#include "choroid/rng.hpp"

#ifndef CHOROID_FIXTURE_DIR
#define CHOROID_FIXTURE_DIR "fixtures"
#endif

namespace test_support {

inline std::filesystem::path fixture_dir() { return CHOROID_FIXTURE_DIR; }

/// Fresh scratch directory per call, under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto p = std::filesystem::temp_directory_path() /
             ("choroid_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline choroid::Image random_image(choroid::Rng& rng, int h, int w) {
    choroid::Image img(h, w);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    return img;
}

inline choroid::Mask random_mask(choroid::Rng& rng, int h, int w, double density) {
    choroid::Mask m(h, w);
    for (auto& v : m.data) v = rng.uniform() < density ? 1 : 0;
    return m;
}

} // namespace test_support
