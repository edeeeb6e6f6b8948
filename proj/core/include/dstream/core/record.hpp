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
#ifndef DSTREAM_CORE_RECORD_HPP_
#define DSTREAM_CORE_RECORD_HPP_

#include <dstream/core/value.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dstream {

using SenderId = std::uint64_t;

/// Runtime-attached ordering stamp: counter is strictly increasing per sender.
struct SequenceStamp {
    SenderId sender = 0;
    std::uint64_t counter = 0;

    friend bool operator==(const SequenceStamp&, const SequenceStamp&) = default;
    friend auto operator<=>(const SequenceStamp&, const SequenceStamp&) = default;
};

/// A payload travelling along a workflow link, plus the metadata the runtime
/// attaches when routing it (receiving port and sender stamp).
class DataRecord {
  public:
    DataRecord() = default;
    explicit DataRecord(Value payload) : payload_(std::move(payload)) {}
    DataRecord(Value payload, std::string in_port, SequenceStamp seq)
        : payload_(std::move(payload)), in_port_(std::move(in_port)), seq_(seq) {}

    const Value& payload() const { return payload_; }
    bool routed() const { return seq_.has_value(); }
    /// Throws MetadataMissing for records that never went through the runtime.
    const SequenceStamp& seq() const;
    const std::string& in_port() const;

  private:
    Value payload_;
    std::string in_port_;
    std::optional<SequenceStamp> seq_;
};

/// Name of the input port the record arrived on (`port_of` in callbacks).
std::string_view record_port(const DataRecord& record);

}// namespace dstream

#endif// DSTREAM_CORE_RECORD_HPP_
