#pragma once

#include "fieldline/fieldline.h"

#include <memory>

namespace fieldline::cli {

struct ProfileDeleter {
    void operator()(fl_profile* p) const { fl_profile_free(p); }
};
struct TrajectoryDeleter {
    void operator()(fl_trajectory* t) const { fl_trajectory_free(t); }
};
struct SusyDeleter {
    void operator()(fl_susy* s) const { fl_susy_free(s); }
};

using ProfileHandle = std::unique_ptr<fl_profile, ProfileDeleter>;
using TrajectoryHandle = std::unique_ptr<fl_trajectory, TrajectoryDeleter>;
using SusyHandle = std::unique_ptr<fl_susy, SusyDeleter>;

}  // namespace fieldline::cli
