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
#include <dstream/core/error.hpp>
#include <dstream/join/join.hpp>

#include <charconv>

namespace dstream {

OperationPtr join_operation(std::string name, JoinFns fns, StrategyPtr default_strategy) {
    OperationSpec s;
    s.name = std::move(name);
    s.in = {"left", "right"};
    s.out = {"matched"};
    s.default_strategy = std::move(default_strategy);
    s.callbacks.emplace("left_key", [f = fns.left_key](CallbackScope& sc) { return f(sc.arg(0)); });
    s.callbacks.emplace("right_key", [f = fns.right_key](CallbackScope& sc) { return f(sc.arg(0)); });
    s.callbacks.emplace("join", [f = fns.join](CallbackScope& sc) { return f(sc.arg(0), sc.arg(1)); });
    return make_operation(std::move(s));
}

Value merge_rows(const Value& left, const Value& right) {
    Value::Dict out = left.as_dict();
    for (const auto& [k, v] : right.as_dict()) {
        out.insert_or_assign(k, v);
    }
    return Value(std::move(out));
}

MatrixConfig MatrixConfig::parse(std::string_view text) {
    auto bad = [&] { return Error(ErrorCode::kInvalidConfig, "matrix must look like RxC, got '" + std::string(text) + "'"); };
    auto x = text.find_first_of("xX");
    if (x == std::string_view::npos) {
        throw bad();
    }
    MatrixConfig c;
    auto parsePart = [&](std::string_view part, std::size_t& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc() || ptr != part.data() + part.size() || out == 0) {
            throw bad();
        }
    };
    parsePart(text.substr(0, x), c.rows);
    parsePart(text.substr(x + 1), c.cols);
    return c;
}

}// namespace dstream
