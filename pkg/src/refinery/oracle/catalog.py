"""The law menu given to proposers: one row per law with its script
syntax, what it produces, and the proviso that must be verified."""

LAW_MENU = (
    ("skip",
     "skip",
     "emits `pass`; verify (x = x_0 /\\ pre) -> post"),
    ("sequence",
     "seq mid: <formula>",
     "splits into [pre, mid]; [mid, post]; no side condition"),
    ("assignment",
     "assign x := <expr>, y := <expr>",
     "emits the assignments; verify (x = x_0 /\\ pre) -> post<x := expr>"),
    ("alternation",
     "ifelse G: <expr>",
     "emits if G: [pre /\\ G, post] else: [pre /\\ ~G, post]; no side condition"),
    ("iteration",
     "iterate I: <formula> G: <expr> V: <formula> mode: initialised|flexible",
     "emits [pre, I]; while G: [I /\\ G, I /\\ V < V_0]; verify (I /\\ ~G) -> post; "
     "initialised mode also requires 0 <= V in the body, flexible mode emits "
     "a runtime assert that V changed"),
    ("traverse",
     "traverse l i m: <formula> n: <formula> P: <formula>",
     "emits [pre, P(l,m)]; i = m; while i < n: [P(l,i), P(l,i+1)]; i = i+1; "
     "verify (forall i, m <= i < n -> P) -> post"),
    ("following assignment",
     "followassign x := <expr>",
     "splits into [pre, post<x := expr>]; x = expr; no side condition"),
    ("flexible sequence",
     "flexseq A: <f> B: <f> C: <f> D: <f>",
     "splits into [A, B]; [C, D]; verify pre -> A, B -> C, D -> post"),
    ("expand",
     "expand y: <type> y0: <expr>",
     "adds variant y; child post gains y = y0; no side condition"),
    ("procedure call",
     "proccall name(<expr>, ...)",
     "reuses a library procedure; verify pre -> entry.pre<args> and "
     "entry.post<args> -> post"),
)


def law_menu_text() -> str:
    lines = []
    for name, syntax, meaning in LAW_MENU:
        lines.append(f"- {name}: `{syntax}`\n  {meaning}")
    return "\n".join(lines)
