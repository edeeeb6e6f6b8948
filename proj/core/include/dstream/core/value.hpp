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
#ifndef DSTREAM_CORE_VALUE_HPP_
#define DSTREAM_CORE_VALUE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dstream {

using NodeIndex = std::uint32_t;
using WorkerId = std::uint64_t;
using Role = std::string;

/// Handle to a worker spawned by a strategy. Only meaningful inside the
/// application that created it.
struct WorkerRef {
    NodeIndex node = 0;
    WorkerId id = 0;
    Role role;

    friend bool operator==(const WorkerRef&, const WorkerRef&) = default;
    friend auto operator<=>(const WorkerRef&, const WorkerRef&) = default;
};

/**
 * Dynamically typed, immutable payload and state value.
 *
 * Operations exchange payloads and keep state as Values so the runtime and the
 * strategies can stay agnostic of application types. Lists and dicts are shared
 * immutable buffers: copying a Value never deep-copies a row, which matters for
 * strategies that replicate one record to many workers.
 */
class Value {
  public:
    using List = std::vector<Value>;
    using Dict = std::map<std::string, Value, std::less<>>;

    enum class Kind : std::uint8_t { kNull, kBool, kInt, kDouble, kString, kList, kDict, kWorker };

    Value() = default;
    Value(std::nullptr_t) {}
    Value(bool b) : data_(b) {}
    Value(int i) : data_(static_cast<std::int64_t>(i)) {}
    Value(long i) : data_(static_cast<std::int64_t>(i)) {}
    Value(long long i) : data_(static_cast<std::int64_t>(i)) {}
    Value(unsigned i) : data_(static_cast<std::int64_t>(i)) {}
    Value(unsigned long i) : data_(static_cast<std::int64_t>(i)) {}
    Value(unsigned long long i) : data_(static_cast<std::int64_t>(i)) {}
    Value(double d) : data_(d) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(std::string_view s) : data_(std::string(s)) {}
    Value(const char* s) : data_(std::string(s)) {}
    Value(List l) : data_(std::make_shared<const List>(std::move(l))) {}
    Value(Dict d) : data_(std::make_shared<const Dict>(std::move(d))) {}
    Value(WorkerRef w) : data_(std::move(w)) {}

    static Value list(std::initializer_list<Value> items) { return Value(List(items)); }
    static Value dict(std::initializer_list<std::pair<const std::string, Value>> items) {
        return Value(Dict(items));
    }

    Kind kind() const { return static_cast<Kind>(data_.index()); }
    bool is_null() const { return kind() == Kind::kNull; }
    bool is_int() const { return kind() == Kind::kInt; }
    bool is_double() const { return kind() == Kind::kDouble; }
    bool is_number() const { return is_int() || is_double(); }
    bool is_string() const { return kind() == Kind::kString; }
    bool is_list() const { return kind() == Kind::kList; }
    bool is_dict() const { return kind() == Kind::kDict; }
    bool is_worker() const { return kind() == Kind::kWorker; }

    bool as_bool() const;
    std::int64_t as_int() const;
    /// Ints widen to double.
    double as_double() const;
    const std::string& as_string() const;
    const List& as_list() const;
    const Dict& as_dict() const;
    const WorkerRef& as_worker() const;

    /// List element access.
    const Value& operator[](std::size_t i) const;
    std::size_t size() const;
    /// Dict field access; throws if the field is absent.
    const Value& at(std::string_view field) const;
    bool contains(std::string_view field) const;

    /// Canonical byte encoding; equal values encode identically.
    void encode(std::string& out) const;
    std::string encoded() const;
    std::string to_string() const;

    std::size_t hash() const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  private:
    using ListPtr = std::shared_ptr<const List>;
    using DictPtr = std::shared_ptr<const Dict>;
    std::variant<std::monostate, bool, std::int64_t, double, std::string, ListPtr, DictPtr, WorkerRef> data_;
};

/// 64-bit digest of the canonical encoding.
std::uint64_t digest(const Value& v);

}// namespace dstream

template<>
struct std::hash<dstream::Value> {
    std::size_t operator()(const dstream::Value& v) const noexcept { return v.hash(); }
};

#endif// DSTREAM_CORE_VALUE_HPP_
