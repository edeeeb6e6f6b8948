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
#include <dstream/core/strategy.hpp>

namespace dstream {

CallbackResult HookContext::call(std::string_view callback, const Value& state, const DataRecord& record) const {
    return call(callback, state, std::span<const Value>(&record.payload(), 1), record.in_port());
}

void DeliverContext::emit(std::string_view port, Value payload) {
    Emissions e;
    e.add(port, std::move(payload));
    emit(e);
}

}// namespace dstream
