"""Direct evaluators for the conditions behind the recognizability encodings.

They read an encoded tuple, split it into its parts and check every condition by plain run
simulation, with no automaton construction involved.
"""
from relkit.automata import END, accepts_plain, path_end, run_plain
from relkit.drat_rec import DIAMOND, DOLLAR, is_null_transparent, plain_view


def _split(seq, sep):
    out, cur = [], []
    for c in seq:
        if c == sep:
            out.append(tuple(cur))
            cur = []
        else:
            cur.append(c)
    out.append(tuple(cur))
    return out


def _is_state(c):
    return isinstance(c, tuple) and len(c) == 2 and c[0] == "state"


def shuffle_condition(a, enc, which):
    """Condition C1 (which=1) or C2 (which=2) on an encoded pair."""
    p = plain_view(a)
    t1, t2 = enc
    if len(t1) < 2 or not (_is_state(t1[0]) and _is_state(t1[1])):
        return False
    q, r, w1 = t1[0][1], t1[1][1], t1[2:]
    if any(_is_state(c) or c in (DIAMOND, DOLLAR) for c in w1):
        return False
    if t2.count(DOLLAR) != 1:
        return False
    sh, y = _split(t2, DOLLAR)
    if any(_is_state(c) or c == DIAMOND for c in y):
        return False
    parts = _split(sh, DIAMOND)
    # g0, h0, then (a_i, g_i, h_i) blocks
    if len(parts) < 5 or (len(parts) - 2) % 3:
        return False
    g, h, v1 = [parts[0]], [parts[1]], []
    for i in range(2, len(parts), 3):
        if len(parts[i]) != 1:
            return False
        v1.append(parts[i][0])
        g.append(parts[i + 1])
        h.append(parts[i + 2])
    if any(_is_state(c) for w in g + h for c in w) or any(_is_state(c) for c in v1):
        return False
    # rhythm: before each a_i both runs wait on the first tape
    for i in range(len(v1)):
        for words, start in ((g, q), (h, q)):
            s = run_plain(p, (tuple(v1[:i]), sum(words[:i + 1], ())), start)
            if s is None or p.owner[s] != 0:
                return False
        s = run_plain(p, (tuple(v1[:i]), ()), r)
        if s is None or p.owner[s] != 0:
            return False
    v1 = tuple(v1)
    v2, x = sum(g, ()), sum(h, ())
    if path_end(p, (v1, v2), q) != q or path_end(p, (v1, x), q) != r:
        return False
    if path_end(p, (v1, ()), r) != r:
        return False
    if which == 1:
        return accepts_plain(p, (w1, x + y), q)
    return accepts_plain(p, (w1, y), r)


def kary_condition(a, enc, which):
    """Condition P1 (which=1) or P2 (which=2) on an encoded tuple."""
    p = plain_view(a)
    t1, rest = enc[0], tuple(enc[1:])
    if t1.count(DOLLAR) != 1:
        return False
    head, w1 = _split(t1, DOLLAR)
    if any(_is_state(c) for c in w1) or any(_is_state(c) or c == DOLLAR for w in rest for c in w):
        return False
    if len(head) < 2 or not _is_state(head[0]):
        return False
    q = head[0][1]
    flat = head[1:]
    if len(flat) % 2 != 1 or not all(_is_state(c) for c in flat[::2]):
        return False
    states = [c[1] for c in flat[::2]]
    letters = flat[1::2]
    if any(_is_state(c) for c in letters) or states[0] != q or states[-1] != q:
        return False
    if any(s not in p.owner for s in states):
        return False
    v1 = []
    for s, c, s2 in zip(states, letters, states[1:]):
        if p.delta.get((s, c)) != s2:
            return False
        if p.owner[s] == 0:
            v1.append(c)
    if not is_null_transparent(p, v1, 0):
        return False
    if which == 1:
        return accepts_plain(p, (w1,) + rest, q)
    return accepts_plain(p, (tuple(v1) + w1,) + rest, q)


def _walk_to_first(p, s, letters, rnd, limit=3):
    """Random tape-2 steps until s reads the first tape; (state, word) or None."""
    word = []
    while p.owner[s] != 0:
        if len(word) >= limit:
            return None
        c = rnd.choice(letters)
        s = p.delta.get((s, c))
        if s is None:
            return None
        word.append(c)
    return s, tuple(word)


def _walk_to(p, s, target, letters, rnd, limit=3):
    word = []
    while s != target:
        if len(word) >= limit or p.owner[s] != 1:
            return None
        c = rnd.choice(letters)
        s = p.delta.get((s, c))
        if s is None:
            return None
        word.append(c)
    return tuple(word)


def sample_shuffle(a, rnd, tries=200):
    """An encoded pair built from actual synchronized runs, or None."""
    p = plain_view(a)
    letters = list(p.alphabet)
    body = [x for x in letters if x != END] or letters

    def word(m):
        # mostly well-formed plain words: body letters then the endmarker
        w = tuple(rnd.choice(body) for _ in range(rnd.randint(0, m)))
        return w + (END,) if rnd.random() < 0.8 else w

    for _ in range(tries):
        q, r = rnd.choice(p.states), rnd.choice(p.states)
        pi, rho, sg = q, q, r
        segs, ok = [], True
        for _i in range(rnd.randint(1, 3)):
            gp = _walk_to_first(p, pi, letters, rnd)
            hp = _walk_to_first(p, rho, letters, rnd)
            if gp is None or hp is None or p.owner[sg] != 0:
                ok = False
                break
            (pi, g), (rho, h) = gp, hp
            c = rnd.choice(body)
            nxt = [p.delta.get((s, c)) for s in (pi, rho, sg)]
            if None in nxt:
                ok = False
                break
            pi, rho, sg = nxt
            segs += [g, h, (c,)]
        if not ok:
            continue
        g = _walk_to(p, pi, q, letters, rnd)
        h = _walk_to(p, rho, r, letters, rnd)
        if g is None or h is None or sg != r:
            continue
        segs += [g, h]
        sh = []
        for j, w in enumerate(segs):
            if j:
                sh.append(DIAMOND)
            sh += list(w)
        return ((("state", q), ("state", r)) + word(2), tuple(sh) + (DOLLAR,) + word(3))
    return None


def sample_flat(a, rnd, tries=200, max_len=8):
    """An encoded P-tuple whose flat run is an actual cycle, or None."""
    p = plain_view(a)
    letters = list(p.alphabet)
    body = [x for x in letters if x != END] or letters

    def word(m):
        w = tuple(rnd.choice(body) for _ in range(rnd.randint(0, m)))
        return w + (END,) if rnd.random() < 0.8 else w

    for _ in range(tries):
        q = rnd.choice(p.states)
        s, flat, first = q, [("state", q)], False
        for _i in range(max_len):
            c = rnd.choice(body if p.owner[s] == 0 else letters)
            nxt = p.delta.get((s, c))
            if nxt is None:
                break
            first |= p.owner[s] == 0
            flat += [c, ("state", nxt)]
            s = nxt
            if s == q and first and rnd.random() < 0.6:
                break
        if s != q or not first:
            continue
        t1 = (("state", q),) + tuple(flat) + (DOLLAR,) + word(2)
        return (t1,) + tuple(word(2) for _ in range(p.k - 1))
    return None
