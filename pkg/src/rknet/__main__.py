from __future__ import annotations

import sys
from typing import Callable, Dict, List

Command = Callable[[List[str]], int]


def registry() -> Dict[str, Command]:
    from .commands.compare import cmd_compare
    from .commands.compile import cmd_compile
    from .commands.help import cmd_help
    from .commands.integrate import cmd_integrate
    from .commands.order import cmd_order
    from .commands.tableau import cmd_tableau
    from .commands.version import cmd_version

    return {
        "compile": cmd_compile,
        "integrate": cmd_integrate,
        "compare": cmd_compare,
        "order": cmd_order,
        "tableau": cmd_tableau,
        "help": cmd_help,
        "version": cmd_version,
    }


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    cmds = registry()

    if not argv or argv[0] in ("-h", "--help"):
        return cmds["help"]([])

    cmd, rest = argv[0], argv[1:]
    if cmd not in cmds:
        print(f"unknown command: {cmd}", file=sys.stderr)
        cmds["help"]([])
        return 2
    return cmds[cmd](rest)


if __name__ == "__main__":
    raise SystemExit(main())
