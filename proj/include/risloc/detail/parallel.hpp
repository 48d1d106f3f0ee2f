// SPDX-License-Identifier: Apache-2.0
//
// rislocate - RIS-assisted near-field localization library and simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISLOC_DETAIL_PARALLEL_HPP
#define RISLOC_DETAIL_PARALLEL_HPP

#include "risloc/types.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace risloc::detail
{
    // Runs fn(begin, end) over contiguous chunks of [0, total) on up to
    // `threads` workers. Chunks are disjoint, so workers need no locking as
    // long as they write disjoint output slices. A single worker still runs
    // on a spawned thread: invoking the functor inline would execute a
    // separately compiled (and differently FMA-contracted) instantiation,
    // and results must not depend on the thread count.
    template <typename Fn>
    void parallel_for_chunks(Index total, unsigned threads, Fn &&fn)
    {
        if (total <= 0)
            return;
        const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const Index base = total / static_cast<Index>(workers);
        const Index rem = total % static_cast<Index>(workers);
        Index begin = 0;
        for (unsigned w = 0; w < workers; ++w)
        {
            const Index len = base + (static_cast<Index>(w) < rem ? 1 : 0);
            const Index end = begin + len;
            pool.emplace_back([&fn, begin, end] { fn(begin, end); });
            begin = end;
        }
        for (std::thread &t : pool)
            t.join();
    }

} // namespace risloc::detail

#endif // RISLOC_DETAIL_PARALLEL_HPP
