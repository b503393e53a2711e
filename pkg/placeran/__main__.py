from placeran.cli import main

raise SystemExit(main())
