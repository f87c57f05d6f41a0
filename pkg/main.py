#!/usr/bin/env python3
"""
Main entry point for Leadterm

    python main.py serve            # HTTP service on config.HOST:config.PORT
    python main.py certify --f ...  # any CLI command, see cli.py
"""

import sys

import config

if __name__ == "__main__":
    if sys.argv[1:2] == ["serve"]:
        import uvicorn
        from local_server import app

        print("🔬 Starting Leadterm certifier service...", file=sys.stderr)
        print(f"📚 API Documentation: http://localhost:{config.PORT}/docs", file=sys.stderr)

        uvicorn.run(
            app,
            host=config.HOST,
            port=config.PORT,
            log_level="info"
        )
    else:
        from cli import main

        sys.exit(main(sys.argv[1:]))
