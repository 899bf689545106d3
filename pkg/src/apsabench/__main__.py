from apsabench.cli import main

raise SystemExit(main())
