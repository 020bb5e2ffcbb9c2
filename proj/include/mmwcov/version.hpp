// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace mmwcov {
inline constexpr const char* kVersionString = "0.1.0";
}
