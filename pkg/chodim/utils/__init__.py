# Utility modules shared by the services
