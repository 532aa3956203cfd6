#!/usr/bin/env python3
"""Generate the Python executability agreement corpus.

Each fixture line is {"id", "source", "executable"} where `executable` is the
reference label: True iff CPython's `compile(..., 'exec')` accepts the source.
`compile` is used instead of `ast.parse` because it also enforces structural
rules (return/yield outside a function, break outside a loop, nonlocal
bindings) while still never executing anything. Regenerate with:

    python3 tools/gen_python_fixtures.py > crates/core/tests/fixtures/python_agreement.jsonl
"""

import json
import sys

VALID_SNIPPETS = [
    "x = 1\n",
    "def f():\n    return 1\n",
    "def add(a, b):\n    return a + b\n",
    "def fib(n):\n    if n < 2:\n        return n\n    return fib(n - 1) + fib(n - 2)\n",
    "for i in range(10):\n    print(i)\n",
    "while True:\n    break\n",
    "x = [1, 2, 3]\ny = {'a': 1}\nz = (1, 2)\n",
    "squares = [i * i for i in range(10)]\n",
    "evens = [i for i in range(20) if i % 2 == 0]\n",
    "pairs = {k: v for k, v in items}\n",
    "unique = {x for x in data}\n",
    "gen = (x + 1 for x in stream)\n",
    "import os\nimport sys\n",
    "from collections import defaultdict\n",
    "from typing import List, Optional\n",
    "import numpy as np\nimport pandas as pd\n",
    "class Stack:\n    def __init__(self):\n        self.items = []\n    def push(self, x):\n        self.items.append(x)\n    def pop(self):\n        return self.items.pop()\n",
    "class Node:\n    def __init__(self, value, next=None):\n        self.value = value\n        self.next = next\n",
    "try:\n    risky()\nexcept ValueError:\n    pass\n",
    "try:\n    risky()\nexcept (TypeError, KeyError) as e:\n    log(e)\nfinally:\n    close()\n",
    "with open('data.txt') as fh:\n    content = fh.read()\n",
    "def apply(fn, xs):\n    return [fn(x) for x in xs]\n",
    "f = lambda x: x * 2\n",
    "g = lambda a, b=1, *args, **kwargs: (a, b, args, kwargs)\n",
    "x, y = y, x\n",
    "a, *rest = [1, 2, 3, 4]\n",
    "total = 0\nfor value in values:\n    total += value\n",
    "matrix = [[0] * 3 for _ in range(3)]\nmatrix[0][0] = 1\n",
    "s = 'single'\nd = \"double\"\nt = '''triple\nmultiline'''\n",
    "raw = r'C:\\\\path\\\\to\\\\file'\nb = b'bytes'\n",
    "msg = f'value is {x}'\n",
    "n = 0xFF + 0o17 + 0b1010 + 1_000_000\n",
    "pi = 3.14159\nsmall = 1e-10\nz = 2 + 3j\n",
    "result = a if condition else b\n",
    "if (n := compute()) > threshold:\n    report(n)\n",
    "def annotated(x: int, y: str = 'hi') -> bool:\n    return bool(x)\n",
    "value: int = 42\nnames: list = []\n",
    "@property\ndef size(self):\n    return self._size\n",
    "@app.route('/healthz')\ndef healthz():\n    return 'ok'\n",
    "async def fetch(url):\n    async with session.get(url) as resp:\n        return await resp.json()\n",
    "async def consume(queue):\n    async for item in queue:\n        handle(item)\n",
    "def gen():\n    yield 1\n    yield from range(5)\n",
    "x = 1; y = 2; z = x + y\n",
    "if ready: launch()\n",
    "assert x > 0, 'x must be positive'\n",
    "del cache[key]\n",
    "global_counter = 0\ndef bump():\n    global global_counter\n    global_counter += 1\n",
    "def outer():\n    state = 0\n    def inner():\n        nonlocal state\n        state += 1\n    return inner\n",
    "raise ValueError('bad input')\n",
    "def wrapped():\n    try:\n        return compute()\n    except Exception as exc:\n        raise RuntimeError('failed') from exc\n",
    "print('hello', 'world', sep=', ', end='\\n')\n",
    "data = {'a': [1, 2], 'b': {'nested': True}}\nflat = data['a'][0]\n",
    "chunk = text[10:20]\nstep = text[::2]\nrev = text[::-1]\n",
    "total = sum(x * x for x in range(100))\n",
    "longest = max(words, key=len)\n",
    "sorted_pairs = sorted(pairs, key=lambda p: p[1], reverse=True)\n",
    "is_valid = all(x > 0 for x in xs) and any(y < 0 for y in ys)\n",
    "binary = bin(255)\nhexed = hex(255)\n",
    "def compose(*fns):\n    def inner(x):\n        for fn in reversed(fns):\n            x = fn(x)\n        return x\n    return inner\n",
    "counts = {}\nfor word in words:\n    counts[word] = counts.get(word, 0) + 1\n",
    "def bsearch(xs, target):\n    lo, hi = 0, len(xs)\n    while lo < hi:\n        mid = (lo + hi) // 2\n        if xs[mid] < target:\n            lo = mid + 1\n        else:\n            hi = mid\n    return lo\n",
    "def quicksort(xs):\n    if len(xs) <= 1:\n        return xs\n    pivot = xs[0]\n    left = [x for x in xs[1:] if x < pivot]\n    right = [x for x in xs[1:] if x >= pivot]\n    return quicksort(left) + [pivot] + quicksort(right)\n",
    "grid = [[1, 2], [3, 4]]\ntransposed = list(zip(*grid))\n",
    "x = (1 +\n     2 +\n     3)\n",
    "y = 1 + \\\n    2\n",
    "items = [\n    'alpha',\n    'beta',\n]\n",
    "def visit(node, depth=0):\n    print(' ' * depth + node.name)\n    for child in node.children:\n        visit(child, depth + 1)\n",
    "memo = {}\ndef solve(n):\n    if n in memo:\n        return memo[n]\n    out = n if n < 2 else solve(n - 1) + solve(n - 2)\n    memo[n] = out\n    return out\n",
    "class Shape:\n    pass\n\nclass Circle(Shape):\n    def __init__(self, r):\n        self.r = r\n",
    "for i, (a, b) in enumerate(pairs):\n    print(i, a, b)\n",
    "while queue:\n    node = queue.pop(0)\n    for nxt in graph[node]:\n        if nxt not in seen:\n            seen.add(nxt)\n            queue.append(nxt)\n",
    "text = ' '.join(str(x) for x in values)\n",
    "if x is None or y is not None:\n    flip()\n",
    "mask = flags & 0b1100 | extra ^ toggle\nshifted = mask << 2 >> 1\n",
    "power = base ** exponent\nremainder = total % size\nquotient = total // size\n",
    "def chain(a):\n    return a.strip().lower().replace(' ', '_')\n",
    "first = 'a' 'b' 'c'\n",
    "x = +1\ny = -x\nz = ~flags\nok = not done\n",
    "def default_args(a, b=2, *args, sep=',', **kw):\n    return a, b, args, sep, kw\n",
    "def keyword_only(*, strict=True):\n    return strict\n",
    "def pos_only(a, b, /, c):\n    return a + b + c\n",
    "result = func(*args, **kwargs)\n",
    "out = call(1, 2, key=3, *more, **rest)\n",
    "class Meta(type):\n    def __new__(mcls, name, bases, ns):\n        return super().__new__(mcls, name, bases, ns)\n",
    "for _ in range(3):\n    pass\nelse:\n    done()\n",
    "values = list(map(int, line.split()))\n",
    "u = v = w = 0\n",
    "board[r][c], board[nr][nc] = board[nr][nc], board[r][c]\n",
    "print(f'{name!r:>10}: {value:.3f}')\n",
    "coefficients = [0.5, -1.25, 3.75e2]\n",
    "ellipsis_stub = ...\n",
    "def typed(xs: 'list[int]') -> 'int':\n    return xs[0]\n",
    "x = d['key']['nested'][0]\n",
    "handlers = {'a': lambda: 1, 'b': lambda: 2}\nresult = handlers[kind]()\n",
]

BROKEN_SNIPPETS = [
    "def f(:\n    return 1\n",
    "def f()\n    return 1\n",
    "def f():\nreturn 1\n",
    "for i in range(10)\n    print(i)\n",
    "while True\n    break\n",
    "x = (1 + 2\n",
    "x = [1, 2\n",
    "x = {1: 2\n",
    "x = 1)\n",
    "x = [1, 2))\n",
    "def f():\n    x = 1\n      y = 2\n",
    "def f():\n    x = 1\n  y = 2\n",
    "if x:\n    a = 1\n\tb = 2\n",
    "s = 'unterminated\n",
    "s = \"also unterminated\n",
    "s = '''never closed\n",
    "x = 1 $ 2\n",
    "x = `backticks`\n",
    "x = 1abc\n",
    "x = 01\n",
    "1 = x\n",
    "(a + b) = 2\n",
    "x + 1 = 2\n",
    "'literal' = x\n",
    "return 42\n",
    "break\n",
    "continue\n",
    "yield 5\n",
    "nonlocal ghost\n",
    "x = = 2\n",
    "x === 3\n",
    "def :\n    pass\n",
    "class :\n    pass\n",
    "class 123Name:\n    pass\n",
    "def f(1x):\n    pass\n",
    "if x\n    pass\n",
    "elif x:\n    pass\n",
    "else:\n    pass\n",
    "except ValueError:\n    pass\n",
    "try:\n    pass\n",
    "finally:\n    pass\nextra = 1\ntry:\n    pass\n",
    "import\n",
    "from import x\n",
    "from os import\n",
    "lambda x:\n",
    "x = lambda :\n",
    "def f(x y):\n    return x\n",
    "print('hello'\n",
    "print 'hello'\n",
    "for in range(3):\n    pass\n",
    "while :\n    pass\n",
    "x = {1: }\n",
    "x = [1,, 2]\n",
    "x = 1 +\n",
    "x = * 2\n",
    "x = 5 /\n",
    "def f():\n",
    "if True:\n",
    "class C:\n",
    "x = dict{}\n",
    "a.1 = 2\n",
    "x.y.z( = 1\n",
    "not_code at all here\n",
    "x = 'mixed \"quotes\n",
    "del 42\n",
    "assert\n",
    "x = yield\n",
    "def f(**kw, *args): pass\n",
    "f(x=1=2)\n",
    "x = 3.14.15\n",
    "import os as\n",
    "with open('f') as:\n    pass\n",
    "x = (,)\n",
    "x = ,1\n",
    "@\ndef f():\n    pass\n",
    "@decorator\nx = 5\n",
]

# Realistic longer programs, valid.
PROGRAMS = [
    '''\
import heapq

def dijkstra(graph, start):
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist.get(node, float('inf')):
            continue
        for neighbor, weight in graph[node]:
            nd = d + weight
            if nd < dist.get(neighbor, float('inf')):
                dist[neighbor] = nd
                heapq.heappush(heap, (nd, neighbor))
    return dist
''',
    '''\
class LRUCache:
    def __init__(self, capacity):
        self.capacity = capacity
        self.store = {}
        self.order = []

    def get(self, key):
        if key not in self.store:
            return -1
        self.order.remove(key)
        self.order.append(key)
        return self.store[key]

    def put(self, key, value):
        if key in self.store:
            self.order.remove(key)
        elif len(self.store) >= self.capacity:
            oldest = self.order.pop(0)
            del self.store[oldest]
        self.store[key] = value
        self.order.append(key)
''',
    '''\
def parse_csv_line(line, sep=','):
    fields = []
    current = []
    in_quotes = False
    for ch in line:
        if ch == '"':
            in_quotes = not in_quotes
        elif ch == sep and not in_quotes:
            fields.append(''.join(current))
            current = []
        else:
            current.append(ch)
    fields.append(''.join(current))
    return fields
''',
    '''\
from dataclasses import dataclass, field

@dataclass
class Interval:
    lo: int
    hi: int
    tags: list = field(default_factory=list)

    def overlaps(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

def merge_intervals(intervals):
    merged = []
    for iv in sorted(intervals, key=lambda iv: iv.lo):
        if merged and merged[-1].hi >= iv.lo:
            merged[-1].hi = max(merged[-1].hi, iv.hi)
        else:
            merged.append(iv)
    return merged
''',
    '''\
def tokenize(expression):
    tokens = []
    i = 0
    while i < len(expression):
        ch = expression[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(expression) and expression[j].isdigit():
                j += 1
            tokens.append(int(expression[i:j]))
            i = j
        elif ch in '+-*/()':
            tokens.append(ch)
            i += 1
        else:
            raise ValueError(f'unexpected character {ch!r}')
    return tokens
''',
    '''\
import json

def load_records(path):
    records = []
    with open(path) as fh:
        for line_number, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f'line {line_number}: {exc}') from exc
    return records
''',
    '''\
def matrix_multiply(a, b):
    rows_a, cols_a = len(a), len(a[0])
    rows_b, cols_b = len(b), len(b[0])
    if cols_a != rows_b:
        raise ValueError('dimension mismatch')
    out = [[0] * cols_b for _ in range(rows_a)]
    for i in range(rows_a):
        for k in range(cols_a):
            if a[i][k] == 0:
                continue
            for j in range(cols_b):
                out[i][j] += a[i][k] * b[k][j]
    return out
''',
    '''\
class EventBus:
    def __init__(self):
        self.subscribers = {}

    def on(self, topic, handler):
        self.subscribers.setdefault(topic, []).append(handler)
        return lambda: self.subscribers[topic].remove(handler)

    def emit(self, topic, *args, **kwargs):
        for handler in self.subscribers.get(topic, []):
            handler(*args, **kwargs)
''',
]

# Broken variants of longer programs.
BROKEN_PROGRAMS = [
    # Missing colon deep in a nested block.
    '''\
def process(items):
    results = []
    for item in items:
        if item.valid
            results.append(item)
    return results
''',
    # Dedent to a level that was never on the stack.
    '''\
def outer():
    if True:
        x = 1
       y = 2
    return x
''',
    # Unbalanced bracket across several lines.
    '''\
config = {
    'name': 'test',
    'values': [1, 2, 3,
    'flag': True,
}
''',
    # Unterminated triple-quoted docstring.
    '''\
def documented():
    """This docstring never ends.
    return 1
''',
    # Keyword misuse inside expression.
    '''\
def f(xs):
    total = 0
    for x in xs:
        total += x if else 0
    return total
''',
    # Assignment to a call.
    '''\
def setup():
    get_config() = {}
    return True
''',
]


def label(source: str) -> bool:
    try:
        compile(source, "<fixture>", "exec")
        return True
    except (SyntaxError, ValueError, MemoryError):
        return False


def main() -> None:
    fixtures = []
    for i, src in enumerate(VALID_SNIPPETS):
        fixtures.append(("valid_%03d" % i, src))
    for i, src in enumerate(BROKEN_SNIPPETS):
        fixtures.append(("broken_%03d" % i, src))
    for i, src in enumerate(PROGRAMS):
        fixtures.append(("program_%03d" % i, src))
    for i, src in enumerate(BROKEN_PROGRAMS):
        fixtures.append(("broken_program_%03d" % i, src))

    # Mechanical mutations of the valid snippets: drop a closing bracket,
    # break the indentation of the second line.
    mutation_id = 0
    for src in VALID_SNIPPETS[:40]:
        for close in ")]}":
            idx = src.rfind(close)
            if idx > 0:
                mutated = src[:idx] + src[idx + 1:]
                fixtures.append(("mutated_%03d" % mutation_id, mutated))
                mutation_id += 1
                break

    for record_id, src in fixtures:
        print(json.dumps({
            "id": record_id,
            "source": src,
            "executable": label(src),
        }))

    counts = {"total": len(fixtures)}
    print("corpus size: %d" % len(fixtures), file=sys.stderr)


if __name__ == "__main__":
    main()
