"""HTTP routers over the skyrme package: verify, scan, kernel."""
