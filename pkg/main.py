"""scalekit: Entry point.

Delegates all work to :func:`cli.dispatcher.main`.
"""

from cli.dispatcher import main

if __name__ == "__main__":
    raise SystemExit(main())
