/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#ifndef DSTREAM_RUNTIME_LOG_HPP_
#define DSTREAM_RUNTIME_LOG_HPP_

#include <spdlog/spdlog.h>

namespace dstream::log {

/// Library logger. Level comes from DSTREAM_LOG_LEVEL (default: warn).
spdlog::logger& logger();

template<class... Args>
void debug(fmt::format_string<Args...> fmt, Args&&... args) {
    if (logger().should_log(spdlog::level::debug)) {
        logger().debug(fmt::format(fmt, std::forward<Args>(args)...));
    }
}

template<class... Args>
void info(fmt::format_string<Args...> fmt, Args&&... args) {
    if (logger().should_log(spdlog::level::info)) {
        logger().info(fmt::format(fmt, std::forward<Args>(args)...));
    }
}

template<class... Args>
void error(fmt::format_string<Args...> fmt, Args&&... args) {
    if (logger().should_log(spdlog::level::err)) {
        logger().error(fmt::format(fmt, std::forward<Args>(args)...));
    }
}

}// namespace dstream::log

#endif// DSTREAM_RUNTIME_LOG_HPP_
