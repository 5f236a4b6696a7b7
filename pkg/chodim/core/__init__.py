# Core application infrastructure
